name = "localityPDL"
__version__ = "1.0.0"
from .lcpdlParams import lcpdlParams
from .localityPDL import localityPDL, lcpdlModel, trainTrace
from .labeledDataset import labeledDataset, loadCSV, synthBlobs
from .modelIO import saveModel, loadModel
