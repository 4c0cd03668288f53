# %% [markdown]
# # Sweeping the B-frame lambda
#
# Scale the B-frame Lagrange multiplier by a constant k, encode at four QPs
# and compare each curve with k = 1 by BD-rate. The k with the best BD-rate is
# the sequence's preferred scale; the question is whether it tracks the ratio
# of P to B distortion seen in the plain encode.
#
# Small clips keep this quick; the acceptance suite runs the full-size version.

# %%
from scipy.stats import spearmanr

from lambdacodec.experiments.fit import fit_power
from lambdacodec.experiments.harness import anchor_ratio, default_k_grid, find_lambda_opt, sweep
from lambdacodec.experiments.synth import corpus

seqs = corpus(frames=21, width=48, height=48)
grid = default_k_grid(9)
grid

# %%
records = sweep(seqs, k_grid=grid)
points = []
for seq in seqs:
    mine = [r for r in records if r.seq == seq.name]
    opt = find_lambda_opt(mine)
    points.append((anchor_ratio(mine), opt.k_star))
    print(f"{seq.name:10s} r_pb {points[-1][0]:.3f}  k* {opt.k_star:.3f}  BD-rate {opt.bd_rate:+.2f}%")

# %% [markdown]
# A positive rank correlation says that sequences whose B frames are relatively
# worse than their P frames (small r_pb) prefer a smaller B-frame lambda.

# %%
print(spearmanr(*zip(*points)))

# %% [markdown]
# ## Fitting the power model
#
# With more points the relation can be summarised as a*r^b + c. Nine points
# from a small sweep are noisy, so treat the fit as illustrative.

# %%
fit = fit_power(points)
fit
