#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# willmoreLab documentation build configuration file

import sys
import os

sys.path.insert(0, os.path.abspath('../../'))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.coverage',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
    'sphinx.ext.napoleon',
]

templates_path = ['_templates']
source_suffix = ['.rst']
master_doc = 'index'

project = 'willmoreLab'
copyright = '2026, willmoreLab developers'
author = 'willmoreLab developers'

# The short X.Y version.
version = '0.1'
# The full version, including alpha/beta/rc tags.
release = '0.1.0'

language = 'en'
exclude_patterns = []
pygments_style = 'sphinx'
todo_include_todos = False

import matplotlib
matplotlib.use('agg')

autodoc_member_order = "bysource"

# -- Options for HTML output ----------------------------------------------

html_theme = 'alabaster'
html_static_path = []
htmlhelp_basename = 'willmoreLabdoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}
latex_documents = [
    (master_doc, 'willmoreLab.tex', 'willmoreLab Documentation',
     'willmoreLab developers', 'manual'),
]

man_pages = [
    (master_doc, 'willmorelab', 'willmoreLab Documentation',
     [author], 1)
]
