from .errors import *
from .ff_core import *
from .ffpoly import *
from .charsum import *
from .counting import *
from .curves import *
from .classnum import *
