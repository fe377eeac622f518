"""
Comparing two reports
=====================

Normalize two short texts, then compare them with TF-IDF cosine and with a
MinHash estimate of shingle Jaccard similarity.
"""

from cohort_audit import normalize, shingles
from cohort_audit.similarity import classify_level, cosine, fit_tfidf, jaccard_estimate, minhash, vectorize

a = "La precipitación efectiva se obtiene restando la abstracción inicial a la lluvia total."
b = "La precipitacion efectiva se obtiene restando la abstraccion inicial de la lluvia total."
c = "El hietograma de diseño reparte el volumen de la tormenta en intervalos de diez minutos."

# accents, case and stop-words are folded away before anything is compared
docs = [normalize(t, source=name) for name, t in (("a", a), ("b", b), ("c", c))]
for d in docs:
    print(d.source, d.tokens)

# TF-IDF cosine over the three documents
model = fit_tfidf(docs)
vecs = [vectorize(model, d) for d in docs]
print("cosine a/b", round(cosine(vecs[0], vecs[1]), 3), classify_level(cosine(vecs[0], vecs[1])))
print("cosine a/c", round(cosine(vecs[0], vecs[2]), 3), classify_level(cosine(vecs[0], vecs[2])))

# MinHash over 3-token shingles; 128 rows give a standard error near 0.04
sigs = [minhash(shingles(d, 3), 128, seed=1) for d in docs]
print("jaccard estimate a/b", jaccard_estimate(sigs[0], sigs[1]))
print("exact jaccard a/b  ", round(shingles(docs[0]).jaccard(shingles(docs[1])), 3))
