"""Small fixtures shared by several test modules."""

from inttsp.instances import from_points


def two_far_triangles():
    # two tight triangles 10 units apart
    return from_points([(0, 0), (0.1, 0), (0, 0.1), (10, 0), (10.1, 0), (10, 0.1)],
                       name="two_triangles")


FIVE_POINTS = [(0, 0), (1, 0), (0, 2), (5, 0), (6, 0)]


def five_points():
    return from_points(FIVE_POINTS, name="five_points")
