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

from setuptools import setup, find_packages
import os

version_folder = os.path.dirname(os.path.join(os.path.abspath(__file__)))
with open(os.path.join(version_folder, 'polymerlab/version/version')) as f:
    __version__ = f.read().strip()

install_requires = [
    'codetiming==1.4.0',
    'hydra-core==1.3.2',
    'numpy==1.26.4',
    'pandas==2.2.3',
    'ray==2.44.1',
    'scipy==1.13.1',
]

TEST_REQUIRES = ['pytest', 'yapf']
WANDB_REQUIRES = ['wandb==0.19.9']

extras_require = {
    'test': TEST_REQUIRES,
    'wandb': WANDB_REQUIRES,
    'all': TEST_REQUIRES + WANDB_REQUIRES,
}

from pathlib import Path
this_directory = Path(__file__).parent
long_description = (this_directory / "README.md").read_text()

setup(
    name='polymerlab',
    version=__version__,
    package_dir={'': '.'},
    packages=find_packages(where='.', exclude=['tests*']),
    license='Apache 2.0',
    author='The polymerlab Authors',
    install_requires=install_requires,
    extras_require=extras_require,
    entry_points={'console_scripts': ['polymerlab = polymerlab.trainer.main_experiment:main']},
    package_data={
        'polymerlab': ['version/*', 'trainer/config/*.yaml'],
    },
    include_package_data=True,
    long_description=long_description,
    long_description_content_type='text/markdown'
)
