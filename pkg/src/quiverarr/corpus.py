"""Built-in arrangement corpus used by the selftest command and the test
suite: empty, a single hyperplane, Boolean coordinate arrangements in 2 and
3 variables, three concurrent lines, two parallel lines, the
discriminantal arrangements C_{1,3} and C_{1,4}, and three generic lines."""

from .arrangement import Arrangement, Hyperplane, discriminantal


def empty_plane():
    return Arrangement(2, [])


def single_hyperplane():
    return Arrangement(1, [Hyperplane(0, [1])])


def boolean2():
    return Arrangement(2, [Hyperplane(0, [1, 0]), Hyperplane(0, [0, 1])])


def boolean3():
    return Arrangement(3, [Hyperplane(0, [1, 0, 0]),
                           Hyperplane(0, [0, 1, 0]),
                           Hyperplane(0, [0, 0, 1])])


def three_lines():
    """z1 = 0, z2 = 0, z1 - z2 = 0 through the origin of C^2."""
    return Arrangement(2, [Hyperplane(0, [1, 0]),
                           Hyperplane(0, [0, 1]),
                           Hyperplane(0, [1, -1])])


def parallel_lines():
    return Arrangement(2, [Hyperplane(0, [1, 0]), Hyperplane(-1, [1, 0])])


def generic_lines():
    """Three lines with three distinct double points and no triple point."""
    return Arrangement(2, [Hyperplane(0, [1, 0]),
                           Hyperplane(0, [0, 1]),
                           Hyperplane(-1, [1, 1])])


def c13():
    return discriminantal([3])[0]


def c14():
    return discriminantal([4])[0]


CORPUS = {
    "empty": empty_plane,
    "single": single_hyperplane,
    "boolean2": boolean2,
    "boolean3": boolean3,
    "three_lines": three_lines,
    "parallel": parallel_lines,
    "c13": c13,
    "c14": c14,
    "generic3": generic_lines,
}

CENTRAL = ("empty", "single", "boolean2", "boolean3", "three_lines", "c13", "c14")

SMALL_CENTRAL = ("single", "boolean2", "boolean3", "three_lines", "c13")
