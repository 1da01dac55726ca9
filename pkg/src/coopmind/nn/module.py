"""Parameter containers: a minimal Module with named traversal."""

from __future__ import annotations

import numpy as np

from .tensor import Parameter


class Module:
    """Base class: any attribute that is a Parameter, a Module, or a
    list of those is discovered by (named_)parameters()."""

    def named_parameters(self, prefix: str = "") -> list[tuple[str, Parameter]]:
        found = []
        for name, value in vars(self).items():
            full = f"{prefix}{name}"
            if isinstance(value, Parameter):
                found.append((full, value))
            elif isinstance(value, Module):
                found.extend(value.named_parameters(f"{full}."))
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Parameter):
                        found.append((f"{full}.{i}", item))
                    elif isinstance(item, Module):
                        found.extend(item.named_parameters(f"{full}.{i}."))
        return found

    def parameters(self) -> list[Parameter]:
        return [p for _, p in self.named_parameters()]

    def state_dict(self) -> dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: dict[str, np.ndarray]):
        params = dict(self.named_parameters())
        missing = set(params) - set(state)
        if missing:
            raise KeyError(f"state dict missing parameters: {sorted(missing)}")
        for name, param in params.items():
            value = np.asarray(state[name])
            if value.shape != param.data.shape:
                raise ValueError(
                    f"{name}: shape {value.shape} does not match {param.data.shape}"
                )
            param.data = value.astype(param.data.dtype)
