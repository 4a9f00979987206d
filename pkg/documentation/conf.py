# Sphinx configuration of the localityPDL documentation.
# Options: https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys
import re

sys.path.insert(0, os.path.abspath(".."))


# -- Project information -----------------------------------------------------

project = "localityPDL"
copyright = "2026, localityPDL developers"
author = "localityPDL developers"

with open(os.path.join("..", "localityPDL", "__init__.py"), "r") as f:
    version_file = f.read()

version_match = re.search(r"^__version__ = ['\"]([^'\"]*)['\"]", version_file, re.M)

if version_match:
    release = version_match.group(1)
else:
    raise RuntimeError("Unable to find version string.")


# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.napoleon",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "sphinx_rtd_theme",
]

source_suffix = {
    ".rst": "restructuredtext",
}

master_doc = "index"
templates_path = []
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]


# -- Options for HTML output -------------------------------------------------

html_theme = "sphinx_rtd_theme"
html_static_path = []
