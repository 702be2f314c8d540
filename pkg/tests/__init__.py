"""
Tests - Pruebas unitarias e integración
"""
