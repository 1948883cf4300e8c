"""Three-photon polarization entanglement from ortho-positronium decay."""
