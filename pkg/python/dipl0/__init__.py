from .exceptions import *
from .type import *
from .utils import *
from .image import *
from .fusion import *
from .metrics import *
from .net import *
from .admm import *
from .io import *
from .config import *
from .report import *
from .sweep import *
from .__version__ import (
    __version__,
    __description__,
    __title__
)
