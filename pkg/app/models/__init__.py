# Models Package
# Pydantic models and solver data structures

from .calendar import *
from .regression import *
from .demand import *
from .network import *
from .request import *
from .graph import *
from .solution import *
from .report import *
from .bus import *
from .horizon import *
