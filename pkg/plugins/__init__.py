#!/usr/bin/env python3
"""eikolab experiment plugins."""
