from setuptools import setup
from ristide import __version__

with open('README.rst') as f:
    readme = f.read()
with open('HISTORY.rst') as f:
    history = f.read()
with open('requirements.txt') as f:
    requires = [line.strip() for line in f if line.strip()]
with open('test-requirements.txt') as f:
    tests_requires = [line.strip() for line in f if line.strip()]

setup(
    name='ristide',
    version=__version__,
    keywords=['ris', 'metasurface', 'mmwave', 'visible light', 'mobility',
              'concept drift', 'simulation'],
    long_description='\n\n'.join([readme, history]),
    description='Crowd mobility and RIS gain drift toolkit for indoor rooms',
    packages=['ristide', 'ristide.sim', 'ristide.stats'],
    package_data={'ristide': ['presets/*.json']},
    entry_points={'console_scripts': ['ristide=ristide.cli:main']},
    classifiers=[
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering',
        'Topic :: Software Development :: Libraries',
    ],
    python_requires='>=3.8',
    install_requires=requires,
    tests_require=tests_requires,
)
