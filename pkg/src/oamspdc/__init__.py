"""Simulator for joint OAM spectra of Type-I SPDC photon pairs.

Models exact phase matching with pump spatial walk-off in a uniaxial
crystal, quantifies OAM non-conservation, and forward-models / inverts a
two-photon interferometric OAM detector.
"""

__version__ = "0.1.0"
