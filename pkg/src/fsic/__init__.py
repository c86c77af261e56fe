"""Numerical companions to collision and no-collision results for rigid bodies in fluids.

Modules
-------
geometry       body profiles ``x_3 = h + r^(1+alpha)`` and the ball
asymptotics    scaling of the model gap integral and regime classification
testfield      explicit divergence-free test fields, their norms and drag
criteria       collision / no-collision predicates
lubridyn       reduced gap ODEs and the Tresca contact schedule
eulerflow      inviscid disk above a wall (conformal annulus, added mass)
collidingflow  explicit colliding viscous flow in an eccentric annulus
particles1d    1D viscous fluid carrying point particles
experiments    registry of reproducible acceptance runs
cli            command line front end (``fsic``)
"""
__version__ = "0.1.0"
