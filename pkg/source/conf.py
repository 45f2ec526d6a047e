# -*- coding: utf-8 -*-
#
# localnewton documentation build configuration file.

import sys, os

sys.path.insert(0, os.path.abspath('../'))

import localnewton

extensions = ['sphinx.ext.autodoc']
templates_path = ['_templates']
source_suffix = '.rst'
autodoc_member_order = 'bysource'
master_doc = 'index'

project = u'localnewton'
copyright = u'2026, the localnewton developers'
version = localnewton.VERSION
release = localnewton.VERSION

exclude_patterns = []
pygments_style = 'sphinx'

html_theme = 'default'
html_static_path = ['_static']
htmlhelp_basename = 'localnewtondoc'

latex_documents = [
  ('index', 'localnewton.tex', u'localnewton Documentation',
   u'the localnewton developers', 'manual'),
]

man_pages = [
    ('index', 'localnewton', u'localnewton Documentation',
     [u'the localnewton developers'], 1)
]
