# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Systemic-Skew."""

from .version import __version__

__all__ = ("__version__",)
