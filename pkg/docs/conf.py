# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Sphinx configuration of the Systemic-Skew documentation."""

import os

# -- General configuration ------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.coverage",
    "sphinx.ext.doctest",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "sphinx.ext.viewcode",
    "sphinx_click.ext",
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "systemic-skew"
copyright = "2026 Systemic-Skew contributors"
author = "Systemic-Skew contributors"

# Get the version string. Cannot be done with import!
g = {}
with open(os.path.join("..", "systemic_skew", "version.py"), "rt") as fp:
    exec(fp.read(), g)
    version = g["__version__"]

release = version

language = "en"
exclude_patterns = ["_build", "Thumbs.db", ".DS_Store"]
pygments_style = "sphinx"
todo_include_todos = False

# Numerical stack objects referenced from docstrings.
intersphinx_mapping = {
    "python": ("https://docs.python.org/3", None),
    "numpy": ("https://numpy.org/doc/stable", None),
    "scipy": ("https://docs.scipy.org/doc/scipy", None),
    "pandas": ("https://pandas.pydata.org/docs", None),
}

# -- Options for HTML output ----------------------------------------------

html_theme = "sphinx_rtd_theme"
html_theme_options = {
    "collapse_navigation": False,
    "navigation_depth": 3,
}
htmlhelp_basename = "systemic-skewdoc"

# -- Options for LaTeX output ---------------------------------------------

latex_documents = [
    (
        master_doc,
        "systemic-skew.tex",
        "Systemic-Skew Documentation",
        author,
        "manual",
    ),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, "systemic-skew", "Systemic-Skew Documentation", [author], 1)
]
