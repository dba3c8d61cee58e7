"""
Decision support on a design trade-off cloud
============================================

A synthetic stand-in for a design study: each sample is a configuration
with an investment level, resulting yearly costs, and a resilience value
(more negative = more resilient). The decision maker wants three clearly
separated classes of configurations: separable by investment alone, and
separable again in the (yearly_costs, resilience) trade-off view, with a
representative (archetype) per class.
"""

import numpy as np

import conceptid as ci

ds = ci.gen_energy_surrogate(4000, seed=4)
cfg = ci.SubspaceConfig.from_column_names(
    [("investment", ["investment"]), ("operation", ["yearly_costs", "resilience"])],
    ds.column_names,
)

model = ci.identify_concepts(
    ds, cfg, n_concepts=3,
    cmaes_config=ci.CmaesConfig(population_size=10, generations=400, initial_sigma=0.3, seed=4),
)
archetypes = ci.select_archetypes(model, ds)

print(f"concept quality Q = {model.q:.4f}")
order = np.argsort([ds.values[model.labeling.members(a), 0].mean() for a in range(3)])
tiers = ["low", "medium", "high"]
for tier, alpha in zip(tiers, order):
    members = model.labeling.members(alpha)
    inv = ds.values[members, 0]
    arch = archetypes[alpha]
    print(f"  {tier:>6}-investment concept: {members.size:4d} configs, "
          f"investment in [{inv.min():.3f}, {inv.max():.3f}], "
          f"archetype #{arch} -> {np.round(ds.values[arch], 2).tolist()}")

a = model.labeling.assigned_mask
overlap = ci.overlap_score(ds.values[a][:, 1:], model.labeling.labels[a])
print(f"overlap in the (yearly_costs, resilience) view: {overlap:.4f}")

km = ci.kmeans(ds, 3, seed=4)
inv_by_cluster = [np.sort(ds.values[km.labels.members(c), 0]) for c in range(3)]
spans = [(v.min(), v.max()) for v in inv_by_cluster]
print("\nk-means investment spans (note the overlaps):",
      [f"[{lo:.2f}, {hi:.2f}]" for lo, hi in sorted(spans)])

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from pathlib import Path

    out = Path(__file__).parent / "output"
    out.mkdir(exist_ok=True)
    fig, axes = plt.subplots(1, 2, figsize=(11, 4))
    un = model.labeling.labels == ci.UNASSIGNED
    axes[0].scatter(ds.values[un, 0], np.zeros(un.sum()), s=4, c="lightgray")
    axes[0].scatter(ds.values[~un, 0], np.zeros((~un).sum()), s=4,
                    c=model.labeling.labels[~un], cmap="viridis")
    axes[0].set_xlabel("investment")
    axes[0].set_yticks([])
    axes[0].set_title("concepts along investment")
    axes[1].scatter(ds.values[un, 1], ds.values[un, 2], s=3, c="lightgray")
    axes[1].scatter(ds.values[~un, 1], ds.values[~un, 2], s=3,
                    c=model.labeling.labels[~un], cmap="viridis")
    for arch in archetypes:
        if arch is not None:
            axes[1].scatter(*ds.values[arch, 1:], marker="*", s=250, c="red", edgecolors="black")
    axes[1].set_xlabel("yearly_costs")
    axes[1].set_ylabel("resilience")
    axes[1].set_title("trade-off view with archetypes")
    fig.tight_layout()
    fig.savefig(out / "design_tradeoffs.png", dpi=120)
    print(f"wrote {out / 'design_tradeoffs.png'}")
except ImportError:
    pass
