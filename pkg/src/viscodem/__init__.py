"""viscodem: mesh-free deep-energy solver for nonlinear viscoelastic solids.

A coordinate-input neural displacement field is trained to minimize the
potential energy of a pseudo-elastic system at each step of an incremental
time loop, with relaxed moduli carrying the viscoelastic history and an
optional stress-modulated growth state.
"""

__version__ = "0.1.0"
