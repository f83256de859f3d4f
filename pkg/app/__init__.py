"""
gdnls-lab: pseudo-spectral laboratory for gDNLS and DNLSb
"""
