"""GIF sentiment ontology toolkit.

Synset forest construction, SentiPair sequences, GSO-2015 datasets,
bag-of-words featurization with correlation-based selection, five
from-scratch classifiers, an evaluation suite, and the annotation service
that produces new datasets.
"""

__version__ = "0.1.0"
