# cli/management/commands/spectrum.py

from cli.base import ToolkitCommand
from cli.renderers import DecayCSVRenderer
from cli.services.pipeline import SpectrumPipeline
from spectrum.serializers import (
    EigenvalueReportSerializer,
    FamilyResultSerializer,
    RhoFitSerializer,
    WeakMixingReportSerializer,
)


class Command(ToolkitCommand):
    help = "Run the eigenvalue pipeline on a tiling spec file and print the report"

    def add_command_arguments(self, parser):
        parser.add_argument("spec_file")
        parser.add_argument("--N", type=int, dest="profile_length", help="Profile length")
        parser.add_argument("--grid", help="Candidate grid lo:hi:step per axis")
        parser.add_argument("--K-max", type=int, dest="k_max", help="Largest shift K tried for the family")

    @staticmethod
    def describe(run) -> dict:
        report = EigenvalueReportSerializer(run.report).data if run.report else {}
        return {
            "rule": run.rule.name,
            "dimension": run.rule.d,
            "banner": run.banner,
            "axes": run.axes,
            "stages": run.completed,
            "errors": run.errors,
            "seed": {
                "label": run.seed.label,
                "position": run.seed.position.tolist(),
                "power": run.seed.power,
            } if run.seed else None,
            "tiles": len(run.patch) if run.patch is not None else None,
            "return_vectors": len(run.xi) if run.xi is not None else None,
            "periods": run.periods.tolist() if run.periods is not None else None,
            "rho": RhoFitSerializer(run.rho_fit).data if run.rho_fit else None,
            "family": FamilyResultSerializer(run.family).data if run.family else None,
            "weak_mixing": WeakMixingReportSerializer(run.probe).data if run.probe else None,
            "candidates": report.get("candidates", []),
            "rank": report.get("rank"),
            "relatively_dense": report.get("relatively_dense"),
            "closure_violations": report.get("closure_violations", []),
        }

    def run(self, config, **options):
        rule = self.load_rule(config, options["spec_file"])
        pipeline = SpectrumPipeline(
            rule,
            seed_tile=config.seed_tile,
            steps=config.profile_length,
            grid=options["grid"],
            k_max=config.k_max,
        )
        run = pipeline.run()
        self.emit(config, self.describe(run), "spectrum.json")

        if run.family is None:
            return
        csv = DecayCSVRenderer()
        for member in run.family.members:
            candidate = member.candidate
            content = csv.render({"eps": member.profile.eps, "bounds": pipeline.decay_bounds(member)})
            self.write(config, f"decay_j{candidate.copy + 1}_l{candidate.shift}_K{candidate.K}.csv", content)
