"""maxface: maximal surfaces in Minkowski 3-space from Weierstrass data.

Branched-cover path calculus, period closure for the genus-k family,
wavefront singularity tracing/classification, and the deformation to
CMC-1 faces in de Sitter 3-space with SU(1,1)-certified monodromy.
"""

__version__ = "0.1.0"
