import itertools

from django.test import SimpleTestCase, override_settings

from conetool.action import enumerate_ball, make_group
from conetool.cone import PolyCone, faces
from conetool.exceptions import ContractError, DomainError, FaceValidationError
from conetool.tiling import (
    BOUNDED_WINDOW_NOTE,
    AmbientRegion,
    Certificate,
    TiledCone,
    Verdict,
    canonical_witness,
    carve_fundamental_domain,
    certify_polyhedral_type,
    descend_to_face,
    dirichlet_carving,
    dirichlet_center,
    face_orbit_representatives,
    generic_center,
    glue_chambers,
    greedy_reduce,
    reduce_point,
    sample_interior,
    sample_relative_interior,
    verify_fundamental_domain,
)
from conetool.warnings import SamplingShortfallWarning, reset_warnings

from .helpers import (
    PELL_INVERSE,
    PELL_MATRIX,
    cone,
    dihedral_group,
    dihedral_tile,
    dihedral_tiling,
    pell_ambient,
    pell_group,
    pell_powers,
    pell_tile,
    pell_tiling,
    quadrant,
    square_cone,
    swap_group,
)


def quadrant_swap_tiling(tile=None):
    return TiledCone(swap_group(), tile or quadrant(), AmbientRegion(quadrant()))


class VerdictTests(SimpleTestCase):

    def test_combine(self):
        self.assertEqual(Verdict.combine([]), Verdict.VERIFIED)
        self.assertEqual(Verdict.combine([Verdict.VERIFIED, Verdict.BUDGET_EXHAUSTED]), Verdict.BUDGET_EXHAUSTED)
        self.assertEqual(
            Verdict.combine([Verdict.REFUTED, Verdict.BUDGET_EXHAUSTED, Verdict.VERIFIED]),
            Verdict.REFUTED,
        )

    def test_certificate_dict(self):
        cert = Certificate("glue", "abc", {"seed": 0}, Verdict.VERIFIED)
        self.assertTrue(cert.verified)
        self.assertEqual(
            cert.to_dict(),
            {
                "kind": "glue",
                "verdict": "verified-on-samples",
                "inputs_digest": "abc",
                "parameters": {"seed": 0},
                "bounded_window": False,
                "witnesses": {},
                "notes": [],
            },
        )


class TiledConeTests(SimpleTestCase):

    def test_tile_must_be_full_dimensional(self):
        with self.assertRaises(ContractError):
            TiledCone(pell_group(), cone((1, 0), rank=2))

    def test_tile_must_be_pointed(self):
        with self.assertRaises(ContractError):
            TiledCone(pell_group(), PolyCone.from_inequalities([(0, 1)]))

    def test_ranks_must_agree(self):
        with self.assertRaises(ContractError):
            TiledCone(pell_group(), cone((1, 0, 0), (0, 1, 0), (0, 0, 1)))


class SamplingTests(SimpleTestCase):

    def test_samples_are_strict_and_deterministic(self):
        first = sample_interior(pell_ambient(), 20, seed=3)
        self.assertEqual(first, sample_interior(pell_ambient(), 20, seed=3))
        self.assertEqual(len(first), 20)
        for x in first:
            self.assertTrue(pell_ambient().contains_closure(x))
            self.assertGreater(x[0] * x[0] - 2 * x[1] * x[1], 0)

    def test_empty_region(self):
        negative = AmbientRegion(quadrant(), ((-1, 0), (0, -1)))
        with self.assertRaises(DomainError):
            sample_interior(negative, 5, seed=0)

    @override_settings(CONETOOL_SAMPLE_ATTEMPTS=1)
    def test_shortfall_warns(self):
        reset_warnings()
        with self.assertWarns(SamplingShortfallWarning):
            points = sample_interior(AmbientRegion(quadrant()), 100, seed=1, box=10)
        self.assertLess(len(points), 100)
        self.assertGreater(len(points), 0)

    def test_relative_interior_samples(self):
        ray = cone((1, 1, 1), rank=3)
        for p in sample_relative_interior(ray, 10, seed=0):
            self.assertTrue(ray.in_relative_interior(p))
        self.assertEqual(sample_relative_interior(PolyCone.zero(2), 5, seed=0), [])

    def test_canonical_witness(self):
        self.assertEqual(canonical_witness([(4, 2), (3, -1), (0, 0), (-2, 2)]), (-1, 1))


class ReductionTests(SimpleTestCase):

    def test_point_in_tile(self):
        element, point = reduce_point(pell_tiling(), (2, 1), fuel=8)
        self.assertTrue(element.is_identity)
        self.assertEqual(point, (2, 1))

    def test_reduce_by_inverse(self):
        result = reduce_point(pell_tiling(), (17, 12), fuel=8)
        self.assertTrue(result.success)
        self.assertEqual(result.element.matrix, PELL_INVERSE)
        self.assertEqual(result.point, (3, 2))
        self.assertEqual(result.steps, 1)

    def test_reduce_by_generator(self):
        element, point = reduce_point(pell_tiling(), (3, -2), fuel=8)
        self.assertEqual(element.matrix, PELL_MATRIX)
        self.assertEqual(point, (1, 0))

    def test_reduction_is_correct(self):
        for x in sample_interior(pell_ambient(), 40, seed=11):
            element, point = reduce_point(pell_tiling(), x, fuel=64)
            self.assertEqual(element.apply(x), point)
            self.assertTrue(pell_tile().contains(point))

    def test_reduction_agrees_with_brute_force(self):
        powers = pell_powers(40)
        for x in sample_interior(pell_ambient(), 30, seed=5):
            with self.subTest(x=x):
                landing = {g for _, g in powers if pell_tile().contains(g.apply(x))}
                self.assertTrue(landing)
                result = reduce_point(pell_tiling(), x, fuel=64)
                self.assertTrue(result.success)
                self.assertIn(result.element, landing)

    def test_bad_inputs(self):
        with self.assertRaises(ContractError):
            reduce_point(pell_tiling(), (0, 0), fuel=8)
        with self.assertRaises(ContractError):
            reduce_point(pell_tiling(), (2, 1), fuel=0)
        with self.assertRaises(DomainError):
            reduce_point(pell_tiling(), (1, 1), fuel=8)

    def test_gap_is_not_reduced(self):
        small = cone((1, 0), (2, 1))
        result = greedy_reduce(pell_group(), small, (5, 3), fuel=64)
        self.assertFalse(result.success)
        for _, g in pell_powers(40):
            self.assertFalse(small.contains(g.apply((5, 3))))

    def test_trivial_group_fails_outside_tile(self):
        group = make_group([], ambient_rank=2)
        result = greedy_reduce(group, cone((1, 0), (1, 1)), (0, 1), fuel=5)
        self.assertFalse(result.success)
        self.assertEqual(result.steps, 0)

    def test_dihedral_points_off_the_greedy_path(self):
        for x in ((-18, 18, 40), (0, -34, 47), (0, -20, 32), (-1, -1, 2)):
            with self.subTest(x=x):
                result = reduce_point(dihedral_tiling(), x, fuel=64)
                self.assertTrue(result.success)
                self.assertEqual(result.element.apply(x), result.point)
                self.assertTrue(dihedral_tile().contains(result.point))

    def test_finite_group_reduction_matches_the_union_of_translates(self):
        group = dihedral_group()
        whole = enumerate_ball(group, 4)
        self.assertTrue(whole.complete)
        narrow = cone((0, 0, 1), (1, 0, 1), (1, 1, 2))
        for tile in (dihedral_tile(), narrow):
            outcomes = set()
            for x in itertools.product(range(-4, 5), range(-4, 5), range(1, 6)):
                if not square_cone().contains(x):
                    continue
                expected = any(tile.contains(g.apply(x)) for g in whole.elements)
                result = greedy_reduce(group, tile, x, fuel=16)
                with self.subTest(tile=tile, x=x):
                    self.assertEqual(result.success, expected)
                    if result.success:
                        self.assertEqual(result.element.apply(x), result.point)
                        self.assertTrue(tile.contains(result.point))
                outcomes.add(expected)
            self.assertEqual(outcomes, {True} if tile == dihedral_tile() else {True, False})


class PolyhedralTypeTests(SimpleTestCase):

    def test_pell_tile_verified(self):
        cert = certify_polyhedral_type(pell_tiling(), samples=100, fuel=64, seed=0)
        self.assertEqual(cert.verdict, Verdict.VERIFIED)
        self.assertEqual(cert.parameters["drawn"], 100)
        self.assertEqual(cert.kind, "polyhedral-type")

    def test_pell_thousand_samples_against_brute_force(self):
        cert = certify_polyhedral_type(pell_tiling(), samples=1000, fuel=64, seed=0)
        self.assertEqual(cert.verdict, Verdict.VERIFIED)
        self.assertEqual(cert.parameters["drawn"], 1000)
        powers = pell_powers(40)
        for x in sample_interior(pell_ambient(), 1000, seed=0):
            landing = {g for _, g in powers if pell_tile().contains(g.apply(x))}
            self.assertTrue(landing, msg=f"{x} has no translate of the tile within 40 steps")
            result = greedy_reduce(pell_group(), pell_tile(), x, fuel=64)
            self.assertIn(result.element, landing)

    def test_dihedral_tile_verified(self):
        cert = certify_polyhedral_type(dihedral_tiling(), samples=500, fuel=64, seed=0)
        self.assertEqual(cert.verdict, Verdict.VERIFIED)
        self.assertEqual(cert.witnesses, {})

    def test_small_tile_leaves_a_gap(self):
        cert = certify_polyhedral_type(pell_tiling(cone((1, 0), (2, 1))), samples=100, fuel=64, seed=0)
        self.assertEqual(cert.verdict, Verdict.BUDGET_EXHAUSTED)
        self.assertGreater(cert.witnesses["unreduced_count"], 0)
        self.assertIn("gap_cone", cert.witnesses)
        self.assertEqual(len(cert.witnesses["unreduced_point"]), 2)

    def test_tile_outside_ambient_refuted(self):
        cert = certify_polyhedral_type(pell_tiling(cone((1, 0), (1, 1))), samples=20, fuel=8, seed=0)
        self.assertEqual(cert.verdict, Verdict.REFUTED)
        self.assertEqual(cert.witnesses["tile_generator_outside_ambient"], ["1", "1"])

    def test_needs_ambient(self):
        with self.assertRaises(ContractError):
            certify_polyhedral_type(TiledCone(pell_group(), pell_tile()), samples=10, fuel=8, seed=0)

    def test_digest_is_stable(self):
        a = certify_polyhedral_type(pell_tiling(), samples=10, fuel=64, seed=5)
        b = certify_polyhedral_type(pell_tiling(), samples=10, fuel=64, seed=5)
        self.assertEqual(a.to_dict(), b.to_dict())


class FundamentalDomainTests(SimpleTestCase):

    def test_dirichlet_center(self):
        self.assertEqual(dirichlet_center(quadrant()), (1, 1))
        self.assertEqual(dirichlet_center(pell_tile()), (4, 2))
        self.assertEqual(generic_center(quadrant()), (1, 2))
        self.assertEqual(generic_center(pell_tile()), (5, 2))

    def test_pell_carving_uses_the_generator_sum(self):
        carving = dirichlet_carving(pell_tiling(), radius=3)
        self.assertEqual(carving.xi, (4, 2))
        self.assertEqual(carving.cuts, ())

    def test_quadrant_swap_is_cut_in_half(self):
        carving = dirichlet_carving(quadrant_swap_tiling(), radius=2)
        self.assertEqual(carving.xi, (1, 2))
        self.assertEqual(carving.cuts, ((1, -1),))
        self.assertEqual(carving.domain, cone((1, 0), (1, 1)))
        self.assertEqual(len(carving.overlapping), 1)

    def test_explicit_center_picks_the_other_half(self):
        carving = dirichlet_carving(quadrant_swap_tiling(), radius=2, xi=(2, 1))
        self.assertEqual(carving.xi, (2, 1))
        self.assertEqual(carving.cuts, ((-1, 1),))
        self.assertEqual(carving.domain, cone((0, 1), (1, 1)))
        cert = verify_fundamental_domain(quadrant_swap_tiling(), carving.domain, 2, 60, 0)
        self.assertEqual(cert.verdict, Verdict.VERIFIED)

    def test_pell_tile_needs_no_cuts(self):
        self.assertEqual(carve_fundamental_domain(pell_tiling(), radius=3), pell_tile())

    def test_radius_must_be_positive(self):
        with self.assertRaises(ContractError):
            dirichlet_carving(pell_tiling(), radius=0)

    def test_verify_half_quadrant(self):
        cert = verify_fundamental_domain(quadrant_swap_tiling(), cone((1, 0), (1, 1)), 2, 60, 0)
        self.assertEqual(cert.verdict, Verdict.VERIFIED)
        self.assertTrue(cert.bounded_window)
        self.assertIn(BOUNDED_WINDOW_NOTE, cert.notes)

    def test_overlapping_domain_refuted(self):
        cert = verify_fundamental_domain(quadrant_swap_tiling(), quadrant(), 2, 60, 0)
        self.assertEqual(cert.verdict, Verdict.REFUTED)
        self.assertEqual(cert.witnesses["overlap_element"]["word"], "g1")
        self.assertEqual(cert.witnesses["overlap_point"], ["1", "1"])

    def test_pell_domain(self):
        cert = verify_fundamental_domain(pell_tiling(), pell_tile(), 3, 50, 0, fuel=64)
        self.assertEqual(cert.verdict, Verdict.VERIFIED)

    def test_domain_outside_ambient(self):
        with self.assertRaises(ContractError):
            verify_fundamental_domain(pell_tiling(), cone((1, 0), (1, 1)), 3, 10, 0)


class FaceDescentTests(SimpleTestCase):

    def test_ray_of_quadrant(self):
        result = descend_to_face(quadrant_swap_tiling(), cone((1, 0), rank=2), radius=2)
        self.assertEqual(result.tile, cone((1, 0), rank=2))
        self.assertEqual(len(result.stabilizer), 1)
        self.assertTrue(result.stabilizer[0].is_identity)
        self.assertEqual(result.certificate.verdict, Verdict.VERIFIED)
        self.assertEqual(len(result.certificate.witnesses["summands"]), 2)
        self.assertEqual(len(result.certificate.witnesses["faces_without_element"]), 1)

    def test_dihedral_diagonal(self):
        F = cone((1, 1, 1), rank=3)
        stabilizer, tile, cert = descend_to_face(dihedral_tiling(), F, radius=4)
        self.assertEqual(len(stabilizer), 2)
        self.assertEqual(tile, F)
        self.assertEqual(cert.verdict, Verdict.VERIFIED)

    def test_every_face_matches_the_brute_force_stabilizer(self):
        for T in (dihedral_tiling(), quadrant_swap_tiling()):
            whole = enumerate_ball(T.group, 4)
            self.assertTrue(whole.complete)
            for face in faces(T.tile):
                if face.cone.is_zero:
                    continue
                F = face.cone
                brute = {
                    g for g in whole.elements
                    if sorted(g.apply(r) for r in F.generators) == sorted(F.generators)
                }
                result = descend_to_face(T, F, radius=4, samples=30, seed=1)
                with self.subTest(face=F):
                    self.assertEqual(set(result.stabilizer), brute)
                    self.assertEqual(result.tile, F)
                    self.assertEqual(result.certificate.verdict, Verdict.VERIFIED)
                    for p in sample_relative_interior(F, 30, seed=1):
                        self.assertTrue(any(result.tile.contains(h.apply(p)) for h in brute))

    def test_non_face_rejected(self):
        with self.assertRaises(FaceValidationError):
            descend_to_face(quadrant_swap_tiling(), cone((1, 1), rank=2), radius=2)

    def test_face_outside_ambient_rejected(self):
        with self.assertRaises(FaceValidationError):
            descend_to_face(quadrant_swap_tiling(), cone((-1, 0), rank=2), radius=2)


class FaceOrbitTests(SimpleTestCase):

    def test_dihedral_faces_are_all_distinct(self):
        classes, cert = face_orbit_representatives(dihedral_tiling(), radius=4)
        self.assertEqual(len(classes), 7)
        self.assertEqual(len(cert.witnesses["classes"]), 7)

    def test_swap_identifies_the_rays(self):
        classes, _ = face_orbit_representatives(quadrant_swap_tiling(), radius=2)
        self.assertEqual(len(classes), 2)
        rays, whole = classes
        self.assertEqual(len(rays.members), 2)
        self.assertEqual(rays.stabilizer_size, 1)
        self.assertEqual(whole.representative, quadrant())
        self.assertEqual(whole.stabilizer_size, 2)


class GlueTests(SimpleTestCase):

    def test_glue_half_quadrant(self):
        half = cone((1, 0), (1, 1))
        tile, cert = glue_chambers(swap_group(), [(quadrant(), half)], AmbientRegion(quadrant()), 50, 16, 0)
        self.assertEqual(tile, half)
        self.assertEqual(cert.verdict, Verdict.VERIFIED)

    def test_glue_pell(self):
        tile, cert = glue_chambers(pell_group(), [(pell_tile(), pell_tile())], pell_ambient(), 50, 64, 0)
        self.assertEqual(tile, pell_tile())
        self.assertEqual(cert.verdict, Verdict.VERIFIED)

    def test_tile_must_sit_in_its_chamber(self):
        with self.assertRaises(ContractError):
            glue_chambers(swap_group(), [(cone((1, 0), (1, 1)), quadrant())], AmbientRegion(quadrant()), 10, 4, 0)

    def test_ray_tile_leaves_every_sample_unreduced(self):
        ray = cone((1, 0), rank=2)
        tile, cert = glue_chambers(swap_group(), [(quadrant(), ray)], AmbientRegion(quadrant()), 50, 16, 0)
        self.assertEqual(tile, ray)
        self.assertEqual(cert.verdict, Verdict.BUDGET_EXHAUSTED)
        self.assertEqual(cert.witnesses["unreduced_count"], cert.parameters["drawn"])
        witness = tuple(int(x) for x in cert.witnesses["unreduced_point"])
        for x in (witness, (1, 1), (2, 1)):
            with self.subTest(x=x):
                self.assertFalse(greedy_reduce(swap_group(), ray, x, fuel=16).success)
                self.assertFalse(any(ray.contains(g.apply(x)) for g in enumerate_ball(swap_group(), 2).elements))
