"""Forward scattering: series solution, boundary integral solver, far fields"""
