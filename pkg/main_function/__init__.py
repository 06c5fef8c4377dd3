"""
Командная строка и фаззинг.
"""
