"""
Consistency in two 2-D subspaces
================================

Three Gaussian clouds in four dimensions, where every subspace view hides
a pair: clouds 2 and 3 coincide in (f1, f2) and clouds 1 and 3 coincide
in (f3, f4). Clustering in the joint space recovers the three clouds but
its groups overlap completely inside each subspace. Concept identification
instead splits the coincident clouds so that the returned groups stay
disjoint in both views, at the cost of leaving samples unassigned.
"""

import conceptid as ci

ds = ci.gen_4d(6000, seed=0, sigma=1.0)
cfg = ci.SubspaceConfig.from_column_names(
    [("s1", ["f1", "f2"]), ("s2", ["f3", "f4"])], ds.column_names
)

model = ci.identify_concepts(
    ds, cfg, n_concepts=3,
    cmaes_config=ci.CmaesConfig(population_size=10, generations=300, initial_sigma=0.3, seed=0),
)
km = ci.kmeans(ds, 3, seed=0)
gm = ci.gmm_em(ds, 3, seed=0)
labelings = {
    "concept": model.labeling,
    "kmeans": km.labels,
    "gmm": gm.labels,
    "kmeans_trunc": ci.truncate_by_radius(km, ds, 0.1),
    "gmm_trunc": ci.truncate_by_radius(gm, ds, 0.1),
}

s1, s2 = ds.values[:, :2], ds.values[:, 2:]
print(f"{'method':>14} {'MI(s1;s2)':>10} {'overlap s1':>11} {'overlap s2':>11} {'assigned':>9}")
for name, lab in labelings.items():
    a = lab.assigned_mask
    mi = ci.ksg_mi(s1[a], s2[a], k=4).value
    ov1 = ci.overlap_score(s1[a], lab.labels[a])
    ov2 = ci.overlap_score(s2[a], lab.labels[a])
    print(f"{name:>14} {mi:10.3f} {ov1:11.4f} {ov2:11.4f} {a.sum():9d}")

print("\nk-means and the GMM overlap heavily (score ~1/3) in each subspace:")
print("whichever two clouds coincide there are indistinguishable. The")
print("concept groups keep overlap near zero in both views and carry far")
print("more mutual information between the subspaces.")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from pathlib import Path

    out = Path(__file__).parent / "output"
    out.mkdir(exist_ok=True)
    fig, axes = plt.subplots(2, 2, figsize=(9, 8))
    for row, (name, lab) in enumerate([("concept", model.labeling), ("kmeans", km.labels)]):
        for col, (view, title) in enumerate([(s1, "(f1, f2)"), (s2, "(f3, f4)")]):
            ax = axes[row, col]
            un = lab.labels == ci.UNASSIGNED
            ax.scatter(view[un, 0], view[un, 1], s=2, c="lightgray")
            ax.scatter(view[~un, 0], view[~un, 1], s=2, c=lab.labels[~un], cmap="viridis")
            ax.set_title(f"{name} in {title}")
    fig.tight_layout()
    fig.savefig(out / "coincident_clouds.png", dpi=120)
    print(f"wrote {out / 'coincident_clouds.png'}")
except ImportError:
    pass
