import os
import sys

sys.path.insert(0, os.path.abspath("../python"))  # NOQA
import dipl0

# -- Project information -----------------------------------------------------

project = 'dipl0'
copyright = '2026, dipl0'
author = 'dipl0'
version = release = dipl0.__version__

# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.mathjax",
    "sphinx.ext.intersphinx",
    "sphinx.ext.autosectionlabel",
    "sphinx_rtd_theme",
    "numpydoc",
]

numpydoc_show_class_members = True
numpydoc_class_members_toctree = False

default_role = "autolink"

intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable", None),
    "scipy": ("https://docs.scipy.org/doc/scipy", None),
    "PIL": ("https://pillow.readthedocs.io/en/stable", None),
}

# dipl0.net.__all__ and dipl0.__all__ overlap; document each object once
autosummary_imported_members = False

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

language = 'en'

# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'

autodoc_member_order = 'bysource'

autosectionlabel_prefix_document = True
autoclass_content = 'class'
