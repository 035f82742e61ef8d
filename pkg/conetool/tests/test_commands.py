import contextlib
import io
import json
import os
import tempfile
from pathlib import Path
from unittest import mock

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from conetool.__main__ import main
from conetool.checks import conetool_settings_check
from conetool.exceptions import ContractError
from conetool.scenario import load_scenario
from conetool.services import COMMANDS, DEMO_BATTERIES, ExitStatus, resolve_budgets, run_command, run_demo
from conetool.signals import certificate_issued
from conetool.tiling import Verdict

QUADRANT = {"rays": [[1, 0], [0, 1]]}
SWAP = [[0, 1], [1, 0]]


class CommandTestMixin:

    def setUp(self):
        super().setUp()
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)

    def write(self, data, name="scenario.json"):
        path = Path(self._tmp.name) / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    def run_cli(self, *args, **options):
        """Run the command; return (status, stdout, stderr)."""
        out, err = io.StringIO(), io.StringIO()
        try:
            call_command("conetool", *args, stdout=out, stderr=err, **options)
        except CommandError as e:
            return e.returncode, out.getvalue(), err.getvalue()
        return 0, out.getvalue(), err.getvalue()

    def report(self, *args, **options):
        status, out, _ = self.run_cli(*args, **options)
        data = json.loads(out)
        self.assertEqual(data["status"], status)
        return data


class BudgetTests(SimpleTestCase):

    def test_defaults(self):
        self.assertEqual(resolve_budgets(), {"radius": 6, "fuel": 64, "samples": 500, "seed": 0})

    def test_flag_beats_scenario(self):
        budgets = resolve_budgets({"radius": 2, "seed": 4}, {"radius": 5})
        self.assertEqual(budgets["radius"], 5)
        self.assertEqual(budgets["seed"], 4)

    @override_settings(CONETOOL_DEFAULT_BUDGETS={"samples": 7})
    def test_configured_defaults(self):
        self.assertEqual(resolve_budgets()["samples"], 7)
        self.assertEqual(resolve_budgets({"samples": 9})["samples"], 9)

    def test_exit_status_order(self):
        self.assertEqual(ExitStatus.worst([0, 3, 2]), 2)
        self.assertEqual(ExitStatus.worst([3, 1, 2]), 1)
        self.assertEqual(ExitStatus.worst([]), 0)
        self.assertEqual(ExitStatus.for_verdict(Verdict.BUDGET_EXHAUSTED), 3)


class BundledCommandTests(CommandTestMixin, SimpleTestCase):

    def test_tile_check_pell(self):
        data = self.report("tile-check", "pell", samples=60)
        self.assertEqual(data["status"], 0)
        self.assertEqual(data["command"], "tile-check")
        self.assertEqual(data["scenario"], "pell")
        self.assertEqual(data["budgets"], {"radius": 6, "fuel": 64, "samples": 60, "seed": 0})
        self.assertEqual(data["certificates"][0]["kind"], "polyhedral-type")
        self.assertEqual(data["certificates"][0]["verdict"], "verified-on-samples")

    def test_reports_are_deterministic(self):
        first = self.run_cli("fundamental-domain", "quadrant-swap", samples=40)
        second = self.run_cli("fundamental-domain", "quadrant-swap", samples=40)
        self.assertEqual(first[:2], second[:2])

    def test_every_command_is_byte_identical_across_runs(self):
        covered = set()
        for scenario, battery in DEMO_BATTERIES.items():
            for command in battery + ("demo",):
                args = ("demo", scenario) if command == "demo" else (command, scenario)
                with self.subTest(command=command, scenario=scenario):
                    first = self.run_cli(*args, samples=40)
                    second = self.run_cli(*args, samples=40)
                    self.assertEqual(first[:2], second[:2])
                    self.assertEqual(json.loads(first[1])["status"], 0)
                covered.add(command)
        self.assertEqual(covered, set(COMMANDS) | {"demo"})

    def test_dihedral_tile_check_at_scenario_budgets(self):
        data = self.report("tile-check", "dihedral")
        self.assertEqual(data["status"], 0)
        self.assertEqual(data["certificates"][0]["parameters"]["drawn"], 500)

    def test_fundamental_domain_quadrant_swap(self):
        data = self.report("fundamental-domain", "quadrant-swap", samples=40)
        self.assertEqual(data["status"], 0)
        self.assertEqual(data["results"]["domain"], {"rank": 2, "rays": [["1", "0"], ["1", "1"]]})
        self.assertTrue(data["results"]["domain_equals_tile"])

    def test_decompose_pell(self):
        data = self.report("decompose", "pell", samples=60)
        self.assertEqual(data["status"], 0)
        self.assertEqual([p["element"]["word"] for p in data["results"]["pieces"]], ["id", "g1"])

    def test_decompose_with_radius_zero_runs_out_of_budget(self):
        data = self.report("decompose", "pell", samples=60, radius=0)
        self.assertEqual(data["status"], ExitStatus.BUDGET_EXHAUSTED)
        self.assertEqual(data["budgets"]["radius"], 0)

    def test_pipeline_nef_quadrant_swap(self):
        data = self.report("pipeline-nef", "quadrant-swap", samples=40)
        self.assertEqual(data["status"], 0)
        self.assertEqual([g["word"] for g in data["results"]["gammas"]], ["id", "g1"])
        self.assertEqual(len(data["results"]["target_classes"]), 1)

    def test_pipeline_effective_pell(self):
        data = self.report("pipeline-effective", "pell", samples=40)
        self.assertEqual(data["status"], 0)
        self.assertEqual(data["certificates"][0]["statement"], "movable-cone")

    def test_descend_dihedral(self):
        data = self.report("descend", "dihedral", samples=40)
        self.assertEqual(data["status"], 0)
        self.assertEqual(len(data["results"]["stabilizer_window"]), 2)
        self.assertEqual(data["results"]["target_tile"], {"rank": 1, "rays": [["1"]]})

    def test_faces_dihedral(self):
        data = self.report("faces", "dihedral")
        self.assertEqual(data["results"]["classes"], 7)

    def test_product(self):
        data = self.report("product", "schoen-toy", samples=40)
        self.assertEqual(data["status"], 0)
        self.assertTrue(data["results"]["span"]["holds"])

    def test_missing_input_is_an_input_error(self):
        data = self.report("decompose", "dihedral")
        self.assertEqual(data["status"], ExitStatus.INPUT_ERROR)
        self.assertIn("ContractError", data["error"])

    def test_human_summary(self):
        status, out, _ = self.run_cli("stabilizer", "quadrant-swap", human=True)
        self.assertEqual(status, 0)
        self.assertTrue(out.startswith("stabilizer on quadrant-swap: verified-on-samples (exit 0)"))

    def test_negative_budget_rejected(self):
        status, out, _ = self.run_cli("tile-check", "pell", radius=-1)
        self.assertEqual(status, ExitStatus.INPUT_ERROR)
        self.assertEqual(out, "")

    def test_budget_cap_from_environment(self):
        with mock.patch.dict(os.environ, {"CONETOOL_BUDGET_CAP": "3"}):
            data = self.report("fundamental-domain", "pell", samples=20)
        self.assertEqual(data["status"], ExitStatus.BUDGET_EXHAUSTED)
        self.assertIn("BudgetExceeded", data["error"])


class DemoTests(CommandTestMixin, SimpleTestCase):

    def test_quadrant_swap_demo(self):
        data = self.report("demo", "quadrant-swap", samples=30)
        self.assertEqual(data["status"], 0)
        self.assertEqual(len(data["results"]["runs"]), 7)

    def test_every_demo_passes(self):
        for name in ("pell", "dihedral", "schoen-toy"):
            report = run_demo(name, {"samples": 30})
            self.assertEqual(report.status, 0, msg="\n".join(report.summary))

    def test_unknown_demo(self):
        data = self.report("demo", "klein")
        self.assertEqual(data["status"], ExitStatus.INPUT_ERROR)


class FailureStatusTests(CommandTestMixin, SimpleTestCase):

    def test_scenario_errors_go_to_stderr(self):
        path = self.write({"rank": 2, "group": {"gens": [[[2, 0], [0, 1]]]}, "target": {"cone": QUADRANT}})
        status, out, err = self.run_cli("validate", path)
        self.assertEqual(status, ExitStatus.INPUT_ERROR)
        self.assertIn("generator 0: determinant 2", err)
        self.assertEqual(json.loads(out)["results"]["errors"][0], f"{path}: $.group.gens: NotUnimodular: generator 0: determinant 2")

    def test_planted_overlap_is_refuted(self):
        path = self.write({
            "rank": 2,
            "group": {"gens": []},
            "target": {"cone": QUADRANT},
            "chambers": [
                {"id": "a", "pullback": [[1, 0], [0, 1]], "target_nef": {"rays": [[1, 0], [1, 1]]}},
                {"id": "b", "pullback": [[1, 0], [0, 1]], "target_nef": {"rays": [[2, 1], [0, 1]]}},
            ],
        })
        data = self.report("validate", path, samples=30)
        self.assertEqual(data["status"], ExitStatus.REFUTED)
        self.assertEqual(data["certificates"][0]["witnesses"]["dichotomy"]["point"], ["3", "2"])

    def test_overlap_found_while_loading(self):
        path = self.write({
            "rank": 2,
            "group": {"gens": [SWAP]},
            "target": {"cone": QUADRANT},
            "chambers": [{"id": "a", "pullback": [[1, 0], [0, 1]], "target_nef": {"rays": [[1, 0], [1, 2]]}}],
        })
        data = self.report("validate", path)
        self.assertEqual(data["status"], ExitStatus.REFUTED)
        self.assertIn("DichotomyViolation", data["error"])

    def test_stabilizer_moving_exceptional_rays(self):
        path = self.write({
            "rank": 2,
            "group": {"gens": [SWAP]},
            "target": {"cone": QUADRANT},
            "chambers": [{"id": "c", "pullback": [[1], [0]], "exc_rays": [[0, 1]], "target_nef": {"rays": [[1]]}}],
            "budgets": {"radius": 2},
        })
        data = self.report("stabilizer", path)
        self.assertEqual(data["status"], ExitStatus.REFUTED)
        certificate = data["certificates"][0]
        self.assertEqual(certificate["witnesses"]["violation"]["word"], "g1")
        self.assertEqual(certificate["witnesses"]["moved_ray"], ["0", "1"])

    def test_unknown_command_for_the_runner(self):
        with self.assertRaises(ContractError):
            run_command("flip", load_scenario("pell"))


class SignalTests(SimpleTestCase):

    def test_certificate_issued(self):
        received = []

        def receiver(sender, **kwargs):
            received.append(kwargs)

        certificate_issued.connect(receiver)
        self.addCleanup(certificate_issued.disconnect, receiver)

        scenario = load_scenario("quadrant-swap")
        report = run_command("stabilizer", scenario, {"samples": 20})
        self.assertEqual(len(received), len(report.certificates))
        self.assertEqual(len(received), 2)
        for kwargs in received:
            self.assertEqual(kwargs["command"], "stabilizer")
            self.assertEqual(kwargs["scenario_digest"], scenario.digest)
            self.assertEqual(kwargs["certificate"]["kind"], "stabilizer")

    def test_no_signal_on_failure(self):
        received = []

        def receiver(sender, **kwargs):
            received.append(kwargs)

        certificate_issued.connect(receiver)
        self.addCleanup(certificate_issued.disconnect, receiver)
        run_command("decompose", load_scenario("dihedral"))
        self.assertEqual(received, [])


class SettingsCheckTests(SimpleTestCase):

    def ids(self):
        return [e.id for e in conetool_settings_check(None)]

    def test_defaults_pass(self):
        self.assertEqual(self.ids(), [])

    @override_settings(CONETOOL_BUDGET_CAP=0)
    def test_bad_cap(self):
        self.assertEqual(self.ids(), ["conetool.E001"])

    @override_settings(CONETOOL_BUDGET_CAP=10 ** 9)
    def test_huge_cap(self):
        self.assertEqual(self.ids(), ["conetool.W001"])

    @override_settings(CONETOOL_DEFAULT_BUDGETS={"radius": -1, "depth": 2})
    def test_bad_budgets(self):
        self.assertEqual(self.ids(), ["conetool.E002", "conetool.E002"])

    @override_settings(CONETOOL_SAMPLE_BOX="50")
    def test_bad_box(self):
        self.assertEqual(self.ids(), ["conetool.E003"])


class EntryPointTests(SimpleTestCase):

    def test_main_prints_json(self):
        out = io.StringIO()
        with contextlib.redirect_stdout(out):
            main(["faces", "quadrant-swap"])
        self.assertEqual(json.loads(out.getvalue())["results"]["classes"], 3)

    def test_main_exits_with_the_status(self):
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            with self.assertRaises(SystemExit) as ctx:
                main(["decompose", "pell", "--radius", "0", "--samples", "30"])
        self.assertEqual(ctx.exception.code, 3)
        self.assertEqual(json.loads(out.getvalue())["status"], 3)
