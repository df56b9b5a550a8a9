"""Smoke test for the wcmesh extension module.

Build and install first:  pip install --no-build-isolation crates/py
"""

import json
import math

import wcmesh


def main():
    regular = wcmesh.Simplex([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])
    center, radius, bary = regular.circumsphere()
    assert max(abs(c) for c in center) < 1e-12
    assert abs(radius - math.sqrt(3)) < 1e-12
    assert regular.well_centered() and regular.completely_well_centered()
    assert regular.equatorial_ball_test().status == "SATISFIED"

    facet = [[0, 0, 0], [1, 0, 0], [0, 1, 0]]
    v = wcmesh.cylinder_condition(facet, [0, 0, 1])
    assert v.status == "BOUNDARY", v
    assert not wcmesh.prism_condition(facet, [0, 0, 1])
    assert wcmesh.polynomial_region_test(facet, [0.5, 0.5, 1]).status == "BOUNDARY"
    assert wcmesh.polynomial_region_test(facet, [2, 2, 1]).status == "VIOLATED"

    counts = [len(wcmesh.enumerate_sphere_triangulations(m)) for m in range(4, 9)]
    assert counts == [1, 1, 2, 5, 14], counts
    certified = sum(
        link.certificate() is not None for link in wcmesh.enumerate_sphere_triangulations(7)
    )
    assert certified == 3

    tets, band = wcmesh.band_family(10)
    assert len(tets) == 8 and band.degree_list()[:2] == [8, 8]
    rec = json.loads(band.classify(embed=False))
    assert rec["wc3"]["status"] == "BLOCKED"

    mesh = wcmesh.TetMesh.fixture("cwc-deg555555444")
    records, code = mesh.check()
    assert code == 0 and records.startswith("#wcmesh-records v1")
    assert mesh.link(0).degree_list() == [5, 5, 5, 5, 5, 5, 4, 4, 4]

    k7 = wcmesh.TetMesh.kgon(7)
    assert (k7.num_vertices, k7.num_tets) == (17, 28)
    grown, new_vertex, eps = k7.insert_degree3_3wc(0, 0)
    assert new_vertex == 17 and eps > 0
    assert all(grown.tet(i).well_centered() for i in range(grown.num_tets))

    again = wcmesh.TetMesh.from_string(k7.to_string())
    assert again.vertices == k7.vertices

    try:
        wcmesh.TetMesh.fixture("tet-C").cube_audit()
    except ValueError:
        pass
    else:
        raise AssertionError("tet-C is not a cube")

    print("python smoke test OK")


if __name__ == "__main__":
    main()
