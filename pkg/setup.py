import pathlib
from setuptools import setup, find_packages

here = pathlib.Path(__file__).parent.resolve()

long_description = (here / "README.md").read_text(encoding="utf-8")

setup(
    name='ersearch-pkg',
    version='1.0.0',
    license='MIT',
    author="ersearch developers",
    packages=find_packages(exclude=("tests", "tests.*")),
    keywords='entity-relationship-retrieval entity-search inverted-index sdm bm25 learning-to-rank trec',
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.21',
        'tqdm>=4.60',
        'environs==9.*',
        'marshmallow>=3.13,<4',
        'scikit-learn>=1.0',
        'ir-measures>=0.3.1',
      ],
    entry_points={
        'console_scripts': [
            'ersearch=ersearch.cli:main',
        ],
    },
    long_description=long_description,
    long_description_content_type="text/markdown",
)
