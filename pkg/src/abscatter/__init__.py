"""Aharonov-Bohm scattering in the plane.

Distorted plane waves, the flux-only scattering kernel and its partial-wave
spectrum, gauge transformations, eikonal phases, X-ray/Radon data, and the
inverse pipelines that recover the magnetic flux and potential data.
"""

__version__ = "0.1.0"
