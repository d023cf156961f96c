# -*- coding: utf-8 -*-
#
# This file is part of Systemic-Skew.
# Copyright (C) 2026 Systemic-Skew contributors.
#
# Systemic-Skew is free software; you can redistribute it and/or modify it
# under the terms of the MIT License; see LICENSE file for more details.

"""Version information for Systemic-Skew.

This file is imported by ``systemic_skew.__init__``
and parsed by ``setup.py``.
"""

__version__ = "0.1.0a1"
