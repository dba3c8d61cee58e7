"""
File-based workflow
===================

The same pipeline through files, mirroring the command line: a dataset
CSV with a header row, a subspace configuration as JSON, labelings as
sample_index/label CSVs, and a JSON consistency report. Equivalent shell
session:

    conceptid gen-data uniform2d --n 2000 --seed 3 --out work/data.csv
    conceptid identify --data work/data.csv --subspaces work/subspaces.json \
        --n-concepts 3 --generations 200 --seed 3 --out work
    conceptid cluster kmeans --data work/data.csv --k 3 --seed 3 --out work
    conceptid evaluate --data work/data.csv --subspaces work/subspaces.json \
        --labels concept=work/labels_concept.csv kmeans=work/labels_kmeans.csv \
        --n-perm 50 --out work
"""

import json
from pathlib import Path

import conceptid as ci
from conceptid.concept_core import Labeling

work = Path(__file__).parent / "output" / "csv_workflow"
work.mkdir(parents=True, exist_ok=True)

# dataset + subspace config on disk
ci.write_csv(ci.gen_2d(2000, seed=3), work / "data.csv")
(work / "subspaces.json").write_text(json.dumps({
    "subspaces": [
        {"name": "f1", "columns": ["f1"]},
        {"name": "f2", "columns": ["f2"]},
    ]
}))

# load, resolve, identify
ds = ci.load_csv(work / "data.csv", config=(work / "subspaces.json").read_text())
cfg = ci.SubspaceConfig.from_json((work / "subspaces.json").read_text(), ds.column_names)
model = ci.identify_concepts(
    ds, cfg, n_concepts=3,
    cmaes_config=ci.CmaesConfig(population_size=10, generations=200, initial_sigma=0.3, seed=3),
)
(work / "model.json").write_text(model.to_json(ds.column_names))
model.labeling.to_csv(work / "labels_concept.csv")

km = ci.kmeans(ds, 3, seed=3)
km.labels.to_csv(work / "labels_kmeans.csv")

# labels round-trip through files, then one evaluation report for both
labelings = {
    "concept": Labeling.from_csv(work / "labels_concept.csv", n_concepts=3),
    "kmeans": Labeling.from_csv(work / "labels_kmeans.csv", n_concepts=3),
}
report = ci.consistency_report(ds, cfg, labelings, k=4, n_perm=50, seed=0)
(work / "report.json").write_text(json.dumps(report.to_json_dict(), indent=2, sort_keys=True))

for name, row in report.to_json_dict()["methods"].items():
    mi = row["mi"]["f1|f2"]
    print(f"{name:>8}: MI = {mi['value']:.3f} nats (p = {mi['p_value']:.3f}), "
          f"overlap f1 = {row['overlap_subspace']['f1']:.4f}")
print(f"\nartifacts in {work}")
