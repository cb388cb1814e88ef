"""corefrank: supervised coreference resolution with ranking models.

Four model families over annotated corpora: mention-pair and
entity-mention classifiers (closest-first or best-first linking),
mention-ranking and cluster-ranking rankers (pipeline or joint
anaphoricity), plus exact ILP joint inference and a B3/CEAF scoring
stack.  See the README for the corpus format and the CLI.
"""

from .corpus import (
    CorpusError,
    Document,
    Mention,
    Partition,
    PartitionDoc,
    head_of,
    load_corpus,
    load_partition_file,
    save_corpus,
    save_partition_file,
    unseen_test,
    unseen_train,
)
from .feats import CONVENTIONAL, LEXICAL, COMBINED
from .instances import (
    TrainSet,
    gen_anaphoricity,
    gen_cluster_ranking,
    gen_entity_mention,
    gen_mention_pair,
    gen_mention_ranking,
)
from .learn import (
    LinearModel,
    TrainerConfig,
    predict_prob,
    score as model_score,
    train_hinge_classifier,
    train_hinge_ranker,
    train_log_classifier,
    train_log_ranker,
)
from .resolve import ResolverSpec, head_match, resolve as resolve_document
from .score import anaphoricity_metrics, bcubed, ceaf_phi3, kuhn_munkres, paired_t_test

__version__ = "0.1.0"
