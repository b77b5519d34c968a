# Physics models: optics, emission source, QRNG, spacetime timing
