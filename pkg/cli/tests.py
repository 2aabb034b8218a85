import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.conf import settings
from django.test import SimpleTestCase, override_settings

from cli.base import INTERNAL, INVALID_RULE, PARSE, RENDER, UNDECIDABLE
from cli.exceptions import InvalidRunConfig
from cli.models import GapVerdict, RunConfig
from cli.renderers import CanonicalJSONRenderer, DecayCSVRenderer, PatchSVGRenderer
from cli.services.pipeline import MeyerTrendService
from tiling.models import TilingPatch
from tiling.services.loader import RuleLoader
from tiling.services.substitution import SubstitutionService

UNIT_FIBONACCI = {
    "prototiles": [{"label": 1, "box": [[0, 1]]}, {"label": 2, "box": [[0, 1]]}],
    "digits": {"1,1": [[0]], "2,1": [[1]], "1,2": [[0]]},
    "expansion": {"min_poly": ["-1", "-1", "1"], "real_blocks": [1.618033988749895]},
    "tile_map": [0, 0],
}


def fixture(name):
    return str(RuleLoader.fixture_path(name))


class CommandTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, name, content):
        path = Path(self.tmp.name) / name
        path.write_text(content if isinstance(content, str) else json.dumps(content))
        return str(path)

    def call(self, *args):
        out, err = StringIO(), StringIO()
        call_command(*args, stdout=out, stderr=err)
        return json.loads(out.getvalue()), err.getvalue()

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as caught:
            call_command(*args, stdout=StringIO(), stderr=StringIO())
        self.assertEqual(caught.exception.returncode, code)
        return caught.exception


class RunConfigTest(CommandTestCase):
    """Tests for per-run limits"""

    def test_defaults_leave_settings(self):
        config = RunConfig.from_options({})
        self.assertEqual(config.overrides(), {})

    def test_limits_must_be_positive(self):
        for options in ({"tile_cap": 0}, {"precision": -1.0}, {"seed_tile": 0}, {"profile_length": 4}, {"k_max": -1}):
            with self.assertRaises(InvalidRunConfig) as caught:
                RunConfig.from_options(options)
            self.assertEqual(caught.exception.get_codes(), "invalid_run_config")

    def test_output_directory_created(self):
        target = Path(self.tmp.name) / "nested" / "out"
        config = RunConfig.from_options({"out": str(target)})
        self.assertTrue(target.is_dir())
        self.assertEqual(config.out_dir, target)

    def test_output_directory_must_be_a_directory(self):
        blocker = self.write("blocker", "x")
        self.assertExitCode(INTERNAL, "validate", fixture("fib.json"), "--out", str(Path(blocker) / "out"))


class RendererTest(SimpleTestCase):
    """Tests for report renderers"""

    def test_canonical_json(self):
        text = CanonicalJSONRenderer().render({"b": np.float64(0.1), "a": [np.int64(2), float("nan")]}).decode()
        self.assertEqual(json.loads(text), {"a": [2, None], "b": 0.1})
        self.assertLess(text.index('"a"'), text.index('"b"'))
        self.assertEqual(text, CanonicalJSONRenderer().render({"a": [2, None], "b": 0.1}).decode())

    def test_decay_csv(self):
        content = DecayCSVRenderer().render({"eps": [0.5, 0.25], "bounds": None}).decode()
        self.assertEqual(content.splitlines(), ["n,eps_n,bound_n", "0,0.5,", "1,0.25,"])

    def test_svg_palette_is_stable(self):
        self.assertEqual(PatchSVGRenderer.colour(1), PatchSVGRenderer.colour(1))
        self.assertNotEqual(PatchSVGRenderer.colour(1), PatchSVGRenderer.colour(2))

    def test_svg_draws_every_tile(self):
        rule = RuleLoader.load_fixture("fib_x_fib.json")
        patch = SubstitutionService.expand(rule, TilingPatch.single(1, np.zeros(2)), 3)
        svg = PatchSVGRenderer().render({"rule": rule, "patch": patch}).decode()
        self.assertTrue(svg.startswith("<?xml"))
        self.assertEqual(svg.count("<rect"), len(patch))


class ClassifyCommandTest(CommandTestCase):
    """Tests for the classify command"""

    def test_cubic_selections(self):
        path = self.write("cubic.json", {"poly": ["3", "-4", "-1", "1"], "selections": [[1, 2], [1]]})
        result, _ = self.call("classify", path)
        self.assertEqual([s["pisot_family"] for s in result["selections"]], ["yes", "no"])
        self.assertAlmostEqual(result["roots"][0]["real"], 2.1987, places=3)

    def test_golden_is_pisot(self):
        result, _ = self.call("classify", self.write("golden.json", ["-1", "-1", "1"]))
        self.assertEqual(result["pisot_number"], "yes")
        self.assertEqual(result["perron"], "yes")

    def test_malformed_json(self):
        self.assertExitCode(PARSE, "classify", self.write("bad.json", "{not json"))

    def test_bad_coefficient(self):
        self.assertExitCode(PARSE, "classify", self.write("bad.json", {"poly": ["1.5", "1"]}))

    def test_missing_file(self):
        self.assertExitCode(INTERNAL, "classify", str(Path(self.tmp.name) / "absent.json"))

    def test_salem_number_is_undecidable(self):
        path = self.write("salem.json", ["1", "-1", "-1", "-1", "1"])
        error = self.assertExitCode(UNDECIDABLE, "classify", path)
        self.assertIn("Undecidable", str(error))


class ValidateCommandTest(CommandTestCase):
    """Tests for the validate command"""

    def test_fixtures_are_valid(self):
        for name in ("fib.json", "nonpisot1d.json", "fib_x_nonpisot.json"):
            result, _ = self.call("validate", fixture(name))
            self.assertTrue(result["valid"], name)
            self.assertTrue(result["primitive"], name)

    def test_volume_violation(self):
        self.assertExitCode(INVALID_RULE, "validate", self.write("unit.json", UNIT_FIBONACCI))

    def test_structural_error_is_a_parse_error(self):
        spec = {**UNIT_FIBONACCI, "tile_map": [0, 5]}
        self.assertExitCode(PARSE, "validate", self.write("bad_map.json", spec))


class ExpandCommandTest(CommandTestCase):
    """Tests for the expand command"""

    def test_fibonacci_eighth_generation(self):
        result, _ = self.call("expand", fixture("fib.json"), "--k", "8")
        self.assertEqual(len(result["tiles"]), 55)
        self.assertEqual(result["generation"], 8)
        labels = [tile["label"] for tile in result["tiles"]]
        self.assertEqual((labels.count(1), labels.count(2)), (34, 21))

    def test_zero_steps_echo_seed(self):
        result, _ = self.call("expand", fixture("fib.json"), "--k", "0", "--seed-tile", "2")
        self.assertEqual(result["tiles"], [{"label": 2, "translation": [0.0]}])

    def test_control_points(self):
        result, _ = self.call("expand", fixture("fib.json"), "--k", "2", "--control-points")
        self.assertTrue(all("control_point" in tile for tile in result["tiles"]))

    def test_render_and_out(self):
        svg = Path(self.tmp.name) / "fib.svg"
        out = Path(self.tmp.name) / "out"
        self.call("expand", fixture("fib.json"), "--k", "5", "--render", str(svg), "--out", str(out))
        self.assertEqual(svg.read_text().count("<rect"), 13)
        self.assertEqual(len(json.loads((out / "patch.json").read_text())["tiles"]), 13)

    def test_render_needs_low_dimension(self):
        path = self.write("cube.json", {"direct_product": [fixture("fib_x_fib.json"), fixture("fib.json")]})
        self.assertExitCode(RENDER, "expand", path, "--k", "1", "--render", str(Path(self.tmp.name) / "x.svg"))

    def test_invalid_rule_reported_on_stderr(self):
        err = StringIO()
        with self.assertRaises(CommandError) as caught:
            call_command("expand", self.write("unit.json", UNIT_FIBONACCI), stdout=StringIO(), stderr=err)
        self.assertEqual(caught.exception.returncode, INVALID_RULE)
        self.assertFalse(json.loads(err.getvalue())["valid"])

    def test_tile_cap(self):
        self.assertExitCode(INTERNAL, "expand", fixture("fib.json"), "--k", "8", "--tile-cap", "10")

    def test_seed_tile_out_of_range(self):
        self.assertExitCode(PARSE, "expand", fixture("fib.json"), "--seed-tile", "3")


class MeyerCommandTest(CommandTestCase):
    """Tests for the meyer command"""

    def test_fibonacci_stable(self):
        result, _ = self.call("meyer", fixture("fib.json"), "--windows", "10,20,40,80")
        self.assertEqual(result["trend"], GapVerdict.STABLE)
        self.assertEqual([w["window"] for w in result["windows"]], [10.0, 20.0, 40.0, 80.0])

    def test_nonpisot_shrinking(self):
        result, _ = self.call("meyer", fixture("nonpisot1d.json"), "--windows", "10,20,40,80")
        self.assertEqual(result["trend"], GapVerdict.SHRINKING)

    def test_single_window(self):
        result, _ = self.call("meyer", fixture("fib.json"), "--windows", "20")
        self.assertEqual(result["trend"], GapVerdict.INCONCLUSIVE)

    def test_bad_windows(self):
        self.assertExitCode(PARSE, "meyer", fixture("fib.json"), "--windows", "10,x")

    def test_trend_rules(self):
        self.assertEqual(MeyerTrendService.trend([1.0, None]), GapVerdict.INCONCLUSIVE)
        self.assertEqual(MeyerTrendService.trend([1.0, 0.95, 0.92]), GapVerdict.STABLE)
        self.assertEqual(MeyerTrendService.trend([1.0, 0.6, 0.4]), GapVerdict.SHRINKING)
        self.assertEqual(MeyerTrendService.trend([1.0, 0.7]), GapVerdict.INCONCLUSIVE)


class SpectrumCommandTest(CommandTestCase):
    """End-to-end runs of the spectrum pipeline on the shipped fixtures"""

    def test_fibonacci(self):
        out = Path(self.tmp.name) / "fib"
        result, _ = self.call("spectrum", fixture("fib.json"), "--out", str(out))
        banner = result["banner"]
        self.assertEqual(banner["pisot_family"], "yes")
        self.assertTrue(banner["relatively_dense"])
        self.assertEqual(banner["weak_mixing_evidence"], "absent")
        self.assertTrue(banner["hypothesis_holds"])
        self.assertTrue(banner["equivalence_consistent"])
        self.assertEqual(result["errors"], [])
        self.assertLessEqual(result["family"]["K"], 2)
        self.assertEqual(result["closure_violations"], [])
        for member in result["family"]["members"]:
            self.assertEqual(member["verdict"], "decays")
            self.assertTrue(0.55 <= member["rate"] <= 0.70)

        csv_files = sorted(out.glob("decay_*.csv"))
        self.assertEqual(len(csv_files), 1)
        header, *rows = csv_files[0].read_text().splitlines()
        self.assertEqual(header, "n,eps_n,bound_n")
        self.assertEqual(len(rows), 26)
        self.assertTrue(all(row.split(",")[2] for row in rows))
        self.assertTrue((out / "spectrum.json").exists())

    def test_nonpisot(self):
        result, _ = self.call("spectrum", fixture("nonpisot1d.json"), "--K-max", "4")
        banner = result["banner"]
        self.assertEqual(banner["pisot_family"], "no")
        self.assertFalse(banner["relatively_dense"])
        self.assertEqual(banner["weak_mixing_evidence"], "consistent")
        self.assertTrue(banner["equivalence_consistent"])
        self.assertIsNone(result["family"])
        self.assertIn("no_passing_k", [error["code"] for error in result["errors"]])
        accepted = [c["gamma"] for c in result["candidates"] if c["verdict"] == "decays"]
        self.assertEqual(accepted, [[0.0]])

    def test_nonpisot_fine_grid(self):
        result, _ = self.call(
            "spectrum", fixture("nonpisot1d.json"), "--grid=-3:3:0.1", "--N", "40", "--K-max", "10"
        )
        self.assertEqual(result["weak_mixing"]["screened"], 61)
        accepted = [c["gamma"] for c in result["candidates"] if c["verdict"] == "decays"]
        self.assertEqual(accepted, [[0.0]])
        self.assertFalse(result["banner"]["relatively_dense"])
        self.assertEqual(result["banner"]["pisot_family"], "no")
        self.assertIn("no_passing_k", [error["code"] for error in result["errors"]])

    def test_fibonacci_square(self):
        result, _ = self.call("spectrum", fixture("fib_x_fib.json"), "--grid=-2:2:0.5")
        banner = result["banner"]
        self.assertEqual(banner["pisot_family"], "yes")
        self.assertTrue(banner["relatively_dense"])
        self.assertTrue(banner["hypothesis_holds"])
        self.assertEqual(result["rank"], 2)
        self.assertEqual([axis["rank"] for axis in result["axes"]], [1, 1])

    def test_mixed_product(self):
        result, _ = self.call("spectrum", fixture("fib_x_nonpisot.json"), "--grid=-2:2:0.5", "--K-max", "2")
        banner = result["banner"]
        self.assertFalse(banner["hypothesis_holds"])
        self.assertIsNone(banner["equivalence_consistent"])
        self.assertEqual(banner["pisot_family"], "no")
        self.assertFalse(result["relatively_dense"])
        self.assertEqual(result["rank"], 1)
        self.assertEqual([axis["rank"] for axis in result["axes"]], [1, 0])
        self.assertEqual([axis["pisot_family"] for axis in result["axes"]], ["yes", "no"])

    @override_settings(SPECTRUM={**settings.SPECTRUM, "SCREEN_CHUNK": 4})
    def test_output_is_deterministic(self):
        for name in ("fib.json", "nonpisot1d.json", "fib_x_fib.json", "fib_x_nonpisot.json"):
            with self.subTest(fixture=name):
                first, second = StringIO(), StringIO()
                args = ("spectrum", fixture(name), "--grid=-1:1:0.5", "--K-max", "3")
                call_command(*args, stdout=first, stderr=StringIO())
                call_command(*args, stdout=second, stderr=StringIO())
                self.assertEqual(first.getvalue(), second.getvalue())

    def test_tile_cap_recorded_as_stage_error(self):
        result, _ = self.call("spectrum", fixture("fib.json"), "--tile-cap", "5")
        self.assertEqual(result["errors"][0]["stage"], "expand")
        self.assertIsNone(result["family"])
        self.assertIsNone(result["banner"]["relatively_dense"])
