from .layers import *
from .network import *
from .optim import *
from .objective import *
from .checkpoint import *
