"""
Subcomandos del CLI: un typer.Typer por comando, combinados en legato.main
"""
