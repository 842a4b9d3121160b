# -*- coding: utf-8 -*-
#
# ristide documentation build configuration file
#
import sys
import os

# If extensions (or modules to document with autodoc) are in another directory,
# add these directories to sys.path here.
sys.path.insert(0, os.path.abspath('..'))
import ristide  # NOQA


def skip(app, what, name, obj, skip, options):
    if name == '__init__' and not isinstance(obj, BaseException):
        return False
    return skip


def setup(app):
    app.connect('autodoc-skip-member', skip)

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
]

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'ristide'
copyright = u'2026, ristide maintainers'

version = ristide.__version__
release = ristide.__version__

exclude_patterns = ['_build']
add_function_parentheses = True
pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = 'default'
html_show_sourcelink = False
html_show_sphinx = False
htmlhelp_basename = 'ristidedoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}
latex_documents = [('index', 'ristide.tex', u'ristide Documentation',
                    u'ristide maintainers', 'manual')]

# -- Options for manual page output ---------------------------------------

man_pages = [
    ('index', 'ristide', u'ristide Documentation',
     [u'ristide maintainers'], 1)
]
