"""
Legato - Continuación entrenada para políticas de flow matching por chunks
"""

__version__ = "1.0.0"
