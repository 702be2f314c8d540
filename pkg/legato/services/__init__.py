"""
Servicios: toda la lógica numérica del proyecto
"""
