"""Far-field harmonic analysis and complex directions"""
