"""
optilik command line interface
Likelihood, posterior and experiment commands on top of the optilik library
"""

__version__ = "0.1.0"
