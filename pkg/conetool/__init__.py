default_app_config = 'conetool.apps.ConetoolConfig'

from .cone import PolyCone, dual_description
from .action import ActionGroup, GroupElement, make_group, orbit_ball
from .tiling import AmbientRegion, Certificate, TiledCone, Verdict
from .chambers import Chamber, ChamberSystem, Marking
from .scenario import load_scenario

__version__ = '0.1.0'
__all__ = [
    'PolyCone',
    'dual_description',
    'ActionGroup',
    'GroupElement',
    'make_group',
    'orbit_ball',
    'AmbientRegion',
    'Certificate',
    'TiledCone',
    'Verdict',
    'Chamber',
    'ChamberSystem',
    'Marking',
    'load_scenario',
]
