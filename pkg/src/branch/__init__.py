"""branch: compose decision trees from five split-node kinds over tabular
datasets, evaluate them under three protocols, and share them in a library."""

from .dataset import (
    MISSING,
    ClassLabeling,
    DataPartition,
    Dataset,
    DatasetSchema,
    FeatureDescriptor,
    Kind,
    Label,
    Sample,
    parse_csv,
    percentage_split,
    search_features,
)
from .errors import BranchError
from .evaluation import (
    ConfusionMatrix,
    EvalMode,
    EvaluationReport,
    LeafStat,
    PercentageSplit,
    TestSet,
    TrainingSet,
    auc,
    ensemble_evaluate,
    ensemble_predict,
    evaluate,
)
from .learners import (
    LearnerSpec,
    LogRegModel,
    StumpModel,
    TrainedModel,
    model_score,
    train_logreg,
    train_stump,
)
from .store import LibraryStore
from .tree import (
    CustomFeatureDef,
    CustomFeatureRule,
    DecisionTree,
    FeatureRule,
    Leaf,
    ModelRule,
    Node,
    Routed,
    Split,
    SplitRule,
    TreeRefRule,
    VisualRule,
    fit_leaf_stats,
    inline_tree_refs,
    predict,
    route,
    tree_from_json,
    tree_to_json,
    validate_tree,
)

__version__ = "0.1.0"
