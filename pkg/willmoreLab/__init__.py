#! /usr/bin/env python3
# coding=utf-8
"""
willmoreLab: numerical checks of the analysis of Willmore and
Willmore-type surfaces.

Conformal charts and their curvature bundles live in :mod:`chart` and
:mod:`geometry`, the conservation law and its potentials in
:mod:`conservation`, curved ambient metrics in :mod:`ambient`, closed
radial shapes and their constrained descent in :mod:`minimize` and the
integral inequalities in :mod:`analysis`. :mod:`cli` drives everything
from TOML configs.
"""
"""
Author: willmoreLab developers
"""

import logging

log = logging.getLogger(__name__)
# log.setLevel(logging.DEBUG)
# stream_handler = logging.StreamHandler()
# stream_handler.setLevel(logging.INFO)
# log.addHandler(stream_handler)

__version__ = '0.1.0'

from . import helpers
from . import chart
from . import sphere_grid
from . import surfaces
from . import geometry
from . import conservation
from . import ambient
from . import minimize
from . import analysis
from . import report
from . import print_report
