# -*- coding: utf-8 -*-
"""
Created on Mon Sep 14 10:12:40 2026

@author: compamg developers
"""

# setup and code access compamg version from this module
__version__ = "0.3.0"
