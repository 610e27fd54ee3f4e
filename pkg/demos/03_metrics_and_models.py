"""Protected-set metrics and the models that defend against them.

Run: python demos/03_metrics_and_models.py
"""
import numpy as np

from bklab import bigkey, learn, task
from bklab.metric import ProtectedMetric

rng = np.random.default_rng(3)
st = task.gen(128, 1024, 8, rng)

T = {2, 4, 5, 6, 7}
m = ProtectedMetric(8, T)
print("weights:", [str(w) for w in m.weights().weights])

x = task.samp(st, 1, rng)
# flip every unprotected feature to the other class
flip = {i: bigkey.enc(st.handles[i], 0, rng) for i in range(8) if i not in T}
xt = task.replace_features(x, flip)
print("distance:", m.dist(x, xt), " admissible:", m.is_admissible(x, xt))
print("plaintexts after:", task.decrypt_all(st, xt))

# known T: one key is enough
small = learn.learn_known_metric(T, st)
print("\nknown-metric model:", small.declared_bits, "bits, reads feature", min(T))
print("  clean:", learn.classifier_for(small)(x), " perturbed:", learn.classifier_for(small)(xt))

# unknown T: majority over all keys survives any class member
full = learn.learn_all(st)
print("all-keys model:", full.declared_bits, "bits")
print("  perturbed:", learn.classifier_for(full)(xt))

# a three-key majority does not
part = learn.learn_partial(st, [0, 1, 3])
print("three-key model:", part.declared_bits, "bits")
print("  perturbed:", learn.classifier_for(part)(xt), "(stored features 0,1 flipped)")
