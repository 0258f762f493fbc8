"""
JSON persistence of trained models: a kind tag, parameters and flattened
numeric arrays (trees as preorder node lists).
"""
from pathlib import Path
from typing import Union

import numpy as np

from config.settings import SCHEMA_VERSION
from utils.errors import InvalidSpec, UnknownModelKind
from utils.helpers import read_json, write_json
from .flat_tree import FlatTree
from .forest import RandomForestModel
from .half_space import HalfSpaceTreesModel
from .isolation import IsolationForestModel
from .linear import LinearModel, OneClassLinearModel
from .scoring import Model, model_kind


def model_to_dict(model: Model) -> dict:
    kind = model_kind(model)
    data = {'kind': kind, 'schema_version': SCHEMA_VERSION}
    if isinstance(model, LinearModel):
        data.update(weights=model.weights, bias=model.bias, loss=model.loss, lr=model.lr,
                    l2=model.l2, epochs_seen=model.epochs_seen)
    elif isinstance(model, OneClassLinearModel):
        data.update(weights=model.weights, rho=model.rho, nu=model.nu, lr=model.lr)
    elif isinstance(model, RandomForestModel):
        data.update(n_features=model.n_features, n_trees=model.n_trees, max_features=model.max_features,
                    feature_importances=model.feature_importances, rng_seed=model.rng_seed,
                    trees=[tree.to_dict() for tree in model.trees])
    elif isinstance(model, IsolationForestModel):
        data.update(n_features=model.n_features, n_trees=model.n_trees, subsample=model.subsample,
                    c_psi=model.c_psi, rng_seed=model.rng_seed,
                    trees=[tree.to_dict() for tree in model.trees])
    elif isinstance(model, HalfSpaceTreesModel):
        data.update(n_features=model.n_features, n_trees=model.n_trees, depth=model.depth,
                    window_size=model.window_size, split_dim=model.split_dim, split_value=model.split_value,
                    reference_mass=model.reference_mass, latest_mass=model.latest_mass,
                    updates_in_window=model.updates_in_window, windows_completed=model.windows_completed,
                    threshold=model.threshold, rng_seed=model.rng_seed,
                    size_limit_ratio=model.size_limit_ratio)
    return data


def model_from_dict(data: dict) -> Model:
    kind = data.get('kind')
    if kind in ('sgd_hinge', 'perceptron'):
        return LinearModel(weights=np.asarray(data['weights']), bias=data['bias'], loss=data['loss'],
                           lr=data['lr'], l2=data['l2'], epochs_seen=data['epochs_seen'])
    if kind == 'oneclass_linear':
        return OneClassLinearModel(weights=np.asarray(data['weights']), rho=data['rho'],
                                   nu=data['nu'], lr=data['lr'])
    if kind == 'random_forest':
        return RandomForestModel(trees=[FlatTree.from_dict(t) for t in data['trees']],
                                 n_features=data['n_features'], n_trees=data['n_trees'],
                                 max_features=data['max_features'],
                                 feature_importances=np.asarray(data['feature_importances']),
                                 rng_seed=data['rng_seed'])
    if kind == 'isolation_forest':
        return IsolationForestModel(trees=[FlatTree.from_dict(t) for t in data['trees']],
                                    n_features=data['n_features'], n_trees=data['n_trees'],
                                    subsample=data['subsample'], rng_seed=data['rng_seed'])
    if kind == 'half_space_trees':
        return HalfSpaceTreesModel(
            split_dim=data['split_dim'], split_value=data['split_value'], n_features=data['n_features'],
            n_trees=data['n_trees'], depth=data['depth'], window_size=data['window_size'],
            reference_mass=data['reference_mass'], latest_mass=data['latest_mass'],
            updates_in_window=data['updates_in_window'], windows_completed=data['windows_completed'],
            threshold=data['threshold'], rng_seed=data['rng_seed'], size_limit_ratio=data['size_limit_ratio'],
        )
    raise UnknownModelKind(f"unknown persisted model kind {kind!r}")


def save_model(model: Model, path: Union[str, Path]) -> Path:
    path = Path(path)
    write_json(path, model_to_dict(model))
    return path


def load_model(path: Union[str, Path]) -> Model:
    data = read_json(path)
    if data.get('schema_version') != SCHEMA_VERSION:
        raise InvalidSpec(f"{path}: unsupported schema_version {data.get('schema_version')!r}")
    return model_from_dict(data)
