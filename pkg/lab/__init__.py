#!/usr/bin/env python3
"""Numerical core of the eikonal lab."""
