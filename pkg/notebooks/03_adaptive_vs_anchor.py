# %% [markdown]
# # Adaptive lambda against the formula lambda
#
# The controller watches P and B distortion as it encodes and nudges the
# B-frame lambda by at most 5% per frame. Here it is compared with the fixed
# formula value on each content class.

# %%
from lambdacodec.codec import EncoderConfig, encode
from lambdacodec.experiments.harness import compare_adaptive, format_table
from lambdacodec.experiments.synth import corpus
from lambdacodec.rdo import Profile

seqs = corpus(seeds=(0,), frames=25)
results = [compare_adaptive(seqs, profile=p) for p in Profile]
print(format_table(results))

# %% [markdown]
# ## One lambda trace
#
# After the first full GOP the controller starts adapting. Frames inside the
# dead band keep the previous value exactly.

# %%
res = encode(seqs[1].frames, EncoderConfig(qp=32, adaptive=True))
for s in res.stats:
    if s.frame_type.name == "B":
        r = "-" if s.ratio is None else f"{s.ratio:.3f}"
        print(f"disp {s.index:2d}  lambda {s.lambda_used:8.3f}  r_pb {r:>6}  dead band {s.dead_band}")
