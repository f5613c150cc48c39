from .util import *
from .synthetic import *
