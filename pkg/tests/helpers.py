from extremal_domains.geometry import FLAT_TORUS, SPHERE_BAND, SPHERE_POLAR, band, disk


def random_domain(rng):
    """A sphere band, a geodesic disk or a flat band with random radii."""
    kind = int(rng.integers(0, 3))
    if kind == 0:
        r1 = float(rng.uniform(-1.3, 0.5))
        return band(SPHERE_BAND, r1, float(rng.uniform(r1 + 0.2, 1.4)))
    if kind == 1:
        return disk(SPHERE_POLAR, float(rng.uniform(0.2, 2.5)))
    r1 = float(rng.uniform(-2.5, 1.0))
    return band(FLAT_TORUS, r1, float(rng.uniform(r1 + 0.2, 2.8)))
