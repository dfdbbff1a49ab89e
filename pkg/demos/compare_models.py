"""
Comparing the three classifiers
===============================

Train the forest, logistic regression and boosted trees on the same split
and write a static report for each one.
"""
import sys
import tempfile
from pathlib import Path

from integrity_kit import data
from integrity_kit.models import ForestConfig, GbtConfig, LogRegConfig
from integrity_kit.pipeline import PipelineConfig, judge, run_training
from integrity_kit.report import metrics_table, scatter_rows, write_report
from integrity_kit.synth import SynthConfig, generate_dataset

schema = data.example_schema()
rules = data.example_rules()
raws, labels = generate_dataset(schema, SynthConfig(n=500, fake_fraction=0.15, seed=3), rules=rules)

# %%
# One config per model kind.  The seed fixes both the split and the forest,
# so the three reports describe the same 100 held-out responses.
configs = {
    "rf": ForestConfig(n_trees=100, max_depth=5, seed=3),
    "logreg": LogRegConfig(),
    "gbt": GbtConfig(),
}
results = {kind: run_training(schema, raws, labels, rules, PipelineConfig(model_kind=kind, model_config=cfg, seed=3))
           for kind, cfg in configs.items()}
print(metrics_table([report for _, report in results.values()]))

# %%
# Write eval.json, the confusion-matrix SVG, the importance chart (tree
# models only) and the jittered score scatter for every model.
out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="integrity-report-"))
for kind, (trained, report) in results.items():
    verdicts = judge(trained, schema, rules, raws)
    scatter = scatter_rows([v.logic for v in verdicts], [v.text for v in verdicts], [v.verdict for v in verdicts], seed=3)
    for path in write_report(out / kind, report, scatter):
        print(path)
