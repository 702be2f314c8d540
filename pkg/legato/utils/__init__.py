"""
Utilidades - Funciones helper, errores y dependencias
"""
