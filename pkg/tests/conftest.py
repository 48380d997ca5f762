import pytest

from toricsec.fans import Fan, fan_from_rays

RAYS = {
    "P1": [(1,), (-1,)],
    "P2": [(1, 0), (0, 1), (-1, -1)],
    "P3": [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)],
    "P4": [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (-1, -1, -1, -1)],
    "P1xP1": [(1, 0), (0, 1), (-1, 0), (0, -1)],
    "S1": [(1, 0), (0, 1), (-1, -1), (1, 1)],
    "S2": [(1, 0), (0, 1), (-1, -1), (1, 1), (-1, 0)],
    "S3": [(1, 0), (0, 1), (-1, -1), (1, 1), (-1, 0), (0, -1)],
    "B1_3": [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, 0, 0), (2, -1, -1)],
    "D1_3": [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, 0, 0), (2, -1, -1), (1, -1, -1)],
    "B1": [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
           (-1, 0, 0, 0), (3, -1, -1, -1)],
    "E1": [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
           (-1, 0, 0, 0), (3, -1, -1, -1), (2, -1, -1, -1)],
    "I1": [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
           (0, -1, 1, 0), (2, 0, -1, -1), (-1, 0, 0, 0), (-1, 0, 1, 0)],
    "J1": [(1, 0, 0, 0), (0, 1, 0, 0), (-1, -1, -1, 0), (0, 0, 1, 0),
           (0, 0, 0, 1), (0, 0, -1, -1), (-1, 0, 0, 0), (-1, 0, 1, 0)],
    "M1": [(1, 0, 0, 0), (0, 1, 0, 0), (-1, -1, 1, 1), (0, 0, 1, 0),
           (0, 0, -1, 0), (0, 0, 0, 1), (0, 0, 0, -1), (-1, 0, 0, 0)],
    "V4": [(1, 0, 0, 0), (-1, 0, 0, 0), (0, 1, 0, 0), (0, -1, 0, 0),
           (0, 0, 1, 0), (0, 0, -1, 0), (0, 0, 0, 1), (0, 0, 0, -1),
           (1, 1, 1, 1)],
    "R3": [(1, 0, 0, 0), (0, 1, 0, 0), (0, -1, 1, -1), (0, 0, 1, 0),
           (0, 0, 0, 1), (0, 0, -1, 0), (1, 0, 0, -1), (-1, 0, 0, 1),
           (-1, 0, 0, 0)],
}


def make_fan(label: str) -> Fan:
    rays = RAYS[label]
    return fan_from_rays(len(rays[0]), rays, label=label)


@pytest.fixture(scope="session")
def fans() -> dict[str, Fan]:
    return {label: make_fan(label) for label in RAYS}
