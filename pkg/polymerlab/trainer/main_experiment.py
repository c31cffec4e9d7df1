# Copyright 2026 The polymerlab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Command-line entry point. Every setting is a hydra override, e.g.

    polymerlab subcommand=free-energy experiment.beta=0.3 'experiment.N_grid=[8,16,32]' out=runs/fe threads=4
"""
import json
import sys
from typing import Any, Dict

import hydra
from omegaconf import OmegaConf

from polymerlab.trainer.experiment_runner import report_error, run
from polymerlab.utils.errors import ConfigValidationError
from polymerlab.utils.tracking import Tracking


@hydra.main(config_path='config', config_name='experiment', version_base=None)
def main(config):
    sys.exit(run_experiment(config))


def load_experiment(config) -> Dict[str, Any]:
    """The raw experiment mapping: the JSON file named by ``config_file`` or the inline node, with ``seed`` applied."""
    if config.config_file:
        try:
            with open(config.config_file) as f:
                raw = json.load(f)
        except OSError as e:
            raise ConfigValidationError([f'cannot read config file {config.config_file}: {e}']) from e
        except json.JSONDecodeError as e:
            raise ConfigValidationError([f'config file {config.config_file} is not valid JSON: {e}']) from e
    else:
        raw = OmegaConf.to_container(config.experiment, resolve=True)
    if config.seed is not None and isinstance(raw, dict):
        raw['base_seed'] = config.seed
    return raw


def run_experiment(config) -> int:
    try:
        raw = load_experiment(config)
    except ConfigValidationError as e:
        return report_error(e)
    tracker = Tracking(project_name=config.project_name,
                       experiment_name=config.experiment_name,
                       default_backend=list(config.logger),
                       config=raw)
    try:
        return run(config.subcommand, raw, config.out, threads=config.threads, tracker=tracker)
    finally:
        tracker.finish()


if __name__ == '__main__':
    main()
